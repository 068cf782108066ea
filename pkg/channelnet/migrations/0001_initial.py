from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='EpochEvent',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run', models.CharField(db_index=True, max_length=255, verbose_name='Run')),
                ('epoch', models.IntegerField(verbose_name='Epoch')),
                ('loss', models.FloatField(verbose_name='Mean loss')),
                ('ser_estimate', models.FloatField(verbose_name='Training SER estimate')),
                ('lr', models.FloatField(verbose_name='Learning rate')),
                ('seconds', models.FloatField(default=0.0, verbose_name='Wall time (s)')),
                ('datetime', models.DateTimeField(auto_now_add=True, verbose_name='Date time')),
            ],
            options={
                'verbose_name': 'epoch event',
                'verbose_name_plural': 'epoch events',
                'ordering': ['-datetime'],
                'indexes': [models.Index(fields=['run', 'epoch'], name='channelnet_run_epoch_idx')],
            },
        ),
        migrations.CreateModel(
            name='SweepEvent',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('detector', models.CharField(db_index=True, max_length=64, verbose_name='Detector')),
                ('scenario', models.CharField(db_index=True, max_length=255, verbose_name='Scenario')),
                ('snr_db', models.FloatField(verbose_name='SNR (dB)')),
                ('symbols', models.BigIntegerField(verbose_name='Symbols')),
                ('errors', models.BigIntegerField(verbose_name='Symbol errors')),
                ('ser', models.FloatField(verbose_name='Symbol error rate')),
                ('ci95', models.FloatField(verbose_name='95% confidence half-width')),
                ('mults', models.BigIntegerField(default=0, verbose_name='Multiplies per detection')),
                ('skipped', models.IntegerField(default=0, verbose_name='Skipped samples')),
                ('seed', models.BigIntegerField(verbose_name='Seed')),
                ('datetime', models.DateTimeField(auto_now_add=True, verbose_name='Date time')),
            ],
            options={
                'verbose_name': 'sweep event',
                'verbose_name_plural': 'sweep events',
                'ordering': ['-datetime'],
                'indexes': [models.Index(fields=['detector', 'scenario'], name='channelnet_det_scen_idx')],
            },
        ),
    ]
